use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CorpusError;

/// One of the four MBTI dichotomies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Extraversion / Introversion.
    Attitude,
    /// Sensing / Intuition.
    Perception,
    /// Thinking / Feeling.
    Judgment,
    /// Judging / Perceiving.
    Lifestyle,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::Attitude, Axis::Perception, Axis::Judgment, Axis::Lifestyle];

    /// The two sides of the axis, first side first (E, S, T, J).
    pub fn sides(self) -> [AxisSide; 2] {
        match self {
            Axis::Attitude => [AxisSide::E, AxisSide::I],
            Axis::Perception => [AxisSide::S, AxisSide::N],
            Axis::Judgment => [AxisSide::T, AxisSide::F],
            Axis::Lifestyle => [AxisSide::J, AxisSide::P],
        }
    }

    fn position(self) -> usize {
        self as usize
    }
}

/// One side of an axis, i.e. one letter of a type code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AxisSide {
    E,
    I,
    S,
    N,
    T,
    F,
    J,
    P,
}

impl AxisSide {
    pub const ALL: [AxisSide; 8] =
        [AxisSide::E, AxisSide::I, AxisSide::S, AxisSide::N, AxisSide::T, AxisSide::F, AxisSide::J, AxisSide::P];

    pub fn axis(self) -> Axis {
        match self {
            AxisSide::E | AxisSide::I => Axis::Attitude,
            AxisSide::S | AxisSide::N => Axis::Perception,
            AxisSide::T | AxisSide::F => Axis::Judgment,
            AxisSide::J | AxisSide::P => Axis::Lifestyle,
        }
    }

    /// `false` for the first side of the axis, `true` for the second.
    fn bit(self) -> bool {
        matches!(self, AxisSide::I | AxisSide::N | AxisSide::F | AxisSide::P)
    }

    pub fn letter(self) -> char {
        match self {
            AxisSide::E => 'E',
            AxisSide::I => 'I',
            AxisSide::S => 'S',
            AxisSide::N => 'N',
            AxisSide::T => 'T',
            AxisSide::F => 'F',
            AxisSide::J => 'J',
            AxisSide::P => 'P',
        }
    }

    /// The 8 types sharing this side.
    pub fn members(self) -> impl Iterator<Item = PersonalityLabel> {
        PersonalityLabel::all().filter(move |l| l.has_side(self))
    }
}

impl fmt::Display for AxisSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// The 16personalities role groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RoleGroup {
    Analyst,
    Diplomat,
    Sentinel,
    Explorer,
}

/// An MBTI type. Internally a 4-bit index: bit 3 attitude (I), bit 2
/// perception (N), bit 1 judgment (F), bit 0 lifestyle (P).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PersonalityLabel(u8);

impl PersonalityLabel {
    pub const COUNT: usize = 16;

    /// All 16 types in index order (ESTJ, ESTP, ESFJ, ... INFP).
    pub fn all() -> impl Iterator<Item = PersonalityLabel> + Clone {
        (0..16u8).map(PersonalityLabel)
    }

    pub fn from_index(index: usize) -> Option<Self> {
        (index < 16).then_some(PersonalityLabel(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Builds a label from its four sides, one per axis in axis order.
    pub fn from_sides(sides: [AxisSide; 4]) -> Option<Self> {
        let mut bits = 0u8;
        for (axis, side) in Axis::ALL.iter().zip(sides) {
            if side.axis() != *axis {
                return None;
            }
            bits = (bits << 1) | side.bit() as u8;
        }
        Some(PersonalityLabel(bits))
    }

    /// The label's side on each axis.
    pub fn axes(self) -> [AxisSide; 4] {
        Axis::ALL.map(|axis| self.side(axis))
    }

    pub fn side(self, axis: Axis) -> AxisSide {
        let bit = (self.0 >> (3 - axis.position())) & 1 == 1;
        axis.sides()[bit as usize]
    }

    pub fn has_side(self, side: AxisSide) -> bool {
        self.side(side.axis()) == side
    }

    pub fn role_group(self) -> RoleGroup {
        use AxisSide::*;
        match (self.side(Axis::Perception), self.side(Axis::Judgment), self.side(Axis::Lifestyle)) {
            (N, T, _) => RoleGroup::Analyst,
            (N, F, _) => RoleGroup::Diplomat,
            (S, _, J) => RoleGroup::Sentinel,
            _ => RoleGroup::Explorer,
        }
    }

    pub fn code(self) -> String {
        self.axes().iter().map(|s| s.letter()).collect()
    }
}

/// Parses a 4-letter type code, case-insensitively.
pub fn parse_personality(code: &str) -> Result<PersonalityLabel, CorpusError> {
    let invalid = || CorpusError::InvalidCode(code.to_string());
    let upper = code.trim().to_ascii_uppercase();
    let letters: Vec<char> = upper.chars().collect();
    if letters.len() != 4 {
        return Err(invalid());
    }
    let mut sides = [AxisSide::E; 4];
    for (i, (axis, letter)) in Axis::ALL.iter().zip(&letters).enumerate() {
        sides[i] = axis.sides().into_iter().find(|s| s.letter() == *letter).ok_or_else(invalid)?;
    }
    PersonalityLabel::from_sides(sides).ok_or_else(invalid)
}

impl FromStr for PersonalityLabel {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_personality(s)
    }
}

impl fmt::Display for PersonalityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

impl fmt::Debug for PersonalityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PersonalityLabel({})", self.code())
    }
}

impl Serialize for PersonalityLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.code())
    }
}

impl<'de> Deserialize<'de> for PersonalityLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_personality(&s).map_err(serde::de::Error::custom)
    }
}
