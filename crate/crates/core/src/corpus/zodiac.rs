use std::fmt;

use serde::{Deserialize, Serialize};

use super::CorpusError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ZodiacSign {
    Aries,
    Taurus,
    Gemini,
    Cancer,
    Leo,
    Virgo,
    Libra,
    Scorpio,
    Sagittarius,
    Capricorn,
    Aquarius,
    Pisces,
}

impl ZodiacSign {
    pub const ALL: [ZodiacSign; 12] = [
        ZodiacSign::Aries,
        ZodiacSign::Taurus,
        ZodiacSign::Gemini,
        ZodiacSign::Cancer,
        ZodiacSign::Leo,
        ZodiacSign::Virgo,
        ZodiacSign::Libra,
        ZodiacSign::Scorpio,
        ZodiacSign::Sagittarius,
        ZodiacSign::Capricorn,
        ZodiacSign::Aquarius,
        ZodiacSign::Pisces,
    ];
}

impl fmt::Display for ZodiacSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Days in `month`, counting February as 29 so that Feb 29 birthdays are valid.
pub(crate) fn days_in_month(month: u8) -> u8 {
    match month {
        2 => 29,
        4 | 6 | 9 | 11 => 30,
        _ => 31,
    }
}

// (month, first day) at which each sign starts, in calendar order.
const STARTS: [(u8, u8, ZodiacSign); 12] = [
    (1, 20, ZodiacSign::Aquarius),
    (2, 19, ZodiacSign::Pisces),
    (3, 21, ZodiacSign::Aries),
    (4, 20, ZodiacSign::Taurus),
    (5, 21, ZodiacSign::Gemini),
    (6, 21, ZodiacSign::Cancer),
    (7, 23, ZodiacSign::Leo),
    (8, 23, ZodiacSign::Virgo),
    (9, 23, ZodiacSign::Libra),
    (10, 23, ZodiacSign::Scorpio),
    (11, 22, ZodiacSign::Sagittarius),
    (12, 22, ZodiacSign::Capricorn),
];

/// Western zodiac sign for a day and month.
///
/// Boundaries: Aries 3/21–4/19, Taurus 4/20–5/20, Gemini 5/21–6/20,
/// Cancer 6/21–7/22, Leo 7/23–8/22, Virgo 8/23–9/22, Libra 9/23–10/22,
/// Scorpio 10/23–11/21, Sagittarius 11/22–12/21, Capricorn 12/22–1/19,
/// Aquarius 1/20–2/18, Pisces 2/19–3/20.
pub fn derive_zodiac(day: u8, month: u8) -> Result<ZodiacSign, CorpusError> {
    if !(1..=12).contains(&month) || day == 0 || day > days_in_month(month) {
        return Err(CorpusError::InvalidDate { day, month });
    }
    let sign = STARTS
        .iter()
        .rev()
        .find(|(m, d, _)| (month, day) >= (*m, *d))
        .map(|(_, _, s)| *s)
        .unwrap_or(ZodiacSign::Capricorn);
    Ok(sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_examples() {
        assert_eq!(derive_zodiac(21, 3).unwrap(), ZodiacSign::Aries);
        assert_eq!(derive_zodiac(31, 12).unwrap(), ZodiacSign::Capricorn);
        assert!(matches!(derive_zodiac(30, 2), Err(CorpusError::InvalidDate { .. })));
        assert_eq!(derive_zodiac(29, 2).unwrap(), ZodiacSign::Pisces);
    }

    // Independent table check: every boundary pair (last day of one sign,
    // first day of the next) taken straight from the documented ranges.
    #[test]
    fn every_boundary_matches_the_table() {
        use ZodiacSign::*;
        let table = [
            ((3, 21), (4, 19), Aries),
            ((4, 20), (5, 20), Taurus),
            ((5, 21), (6, 20), Gemini),
            ((6, 21), (7, 22), Cancer),
            ((7, 23), (8, 22), Leo),
            ((8, 23), (9, 22), Virgo),
            ((9, 23), (10, 22), Libra),
            ((10, 23), (11, 21), Scorpio),
            ((11, 22), (12, 21), Sagittarius),
            ((12, 22), (1, 19), Capricorn),
            ((1, 20), (2, 18), Aquarius),
            ((2, 19), (3, 20), Pisces),
        ];
        for ((m0, d0), (m1, d1), sign) in table {
            assert_eq!(derive_zodiac(d0, m0).unwrap(), sign, "{d0}/{m0}");
            assert_eq!(derive_zodiac(d1, m1).unwrap(), sign, "{d1}/{m1}");
        }
        assert_eq!(derive_zodiac(1, 1).unwrap(), Capricorn);
    }

    #[test]
    fn every_valid_day_has_a_sign_and_each_sign_is_used() {
        let mut seen = std::collections::BTreeSet::new();
        for month in 1..=12 {
            for day in 1..=days_in_month(month) {
                seen.insert(derive_zodiac(day, month).unwrap());
            }
        }
        assert_eq!(seen.len(), 12);
        assert!(derive_zodiac(0, 1).is_err());
        assert!(derive_zodiac(1, 13).is_err());
        assert!(derive_zodiac(31, 4).is_err());
    }
}
