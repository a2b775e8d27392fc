//! Arabic tweet cleaning and unigram tokenization.
//!
//! [`PreprocessConfig::clean`] runs a fixed sequence of stages:
//!
//! 1. strip diacritics (and tatweel),
//! 2. replace special symbols with spaces,
//! 3. collapse runs of a repeated codepoint,
//! 4. drop words that carry no Arabic letter,
//! 5. normalize whitespace.
//!
//! The result only ever contains Arabic letters, digits and single spaces,
//! and cleaning is idempotent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tatweel (kashida), the elongation stroke.
pub const TATWEEL: char = '\u{0640}';

/// An inclusive codepoint range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodepointRange {
    pub start: u32,
    pub end: u32,
}

impl CodepointRange {
    pub const fn new(start: u32, end: u32) -> Self {
        Self { start, end }
    }

    pub fn contains(&self, c: char) -> bool {
        (self.start..=self.end).contains(&(c as u32))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PreprocessConfig {
    /// Runs of one codepoint longer than this are shortened to this length.
    pub collapse_repeats_to: usize,
    pub arabic_letter_ranges: Vec<CodepointRange>,
    pub diacritic_codepoints: Vec<u32>,
    pub strip_tatweel: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        let mut diacritic_codepoints: Vec<u32> = (0x064B..=0x0652).collect();
        diacritic_codepoints.push(0x0670);
        Self {
            collapse_repeats_to: 2,
            arabic_letter_ranges: vec![CodepointRange::new(0x0621, 0x064A), CodepointRange::new(0x0671, 0x06D3)],
            diacritic_codepoints,
            strip_tatweel: true,
        }
    }
}

/// ASCII digits plus Arabic-Indic and extended Arabic-Indic digits.
pub fn is_digit(c: char) -> bool {
    c.is_ascii_digit() || ('\u{0660}'..='\u{0669}').contains(&c) || ('\u{06F0}'..='\u{06F9}').contains(&c)
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.collapse_repeats_to == 0 {
            return Err(Error::Config("collapse_repeats_to must be at least 1".into()));
        }
        for r in &self.arabic_letter_ranges {
            if r.start > r.end {
                return Err(Error::Config(format!(
                    "empty Arabic letter range {:#06X}..={:#06X}",
                    r.start, r.end
                )));
            }
        }
        if let Some(cp) = self.diacritic_codepoints.iter().find(|&&cp| {
            self.arabic_letter_ranges
                .iter()
                .any(|r| (r.start..=r.end).contains(&cp))
        }) {
            return Err(Error::Config(format!(
                "diacritic U+{cp:04X} overlaps the Arabic letter ranges"
            )));
        }
        Ok(())
    }

    pub fn is_arabic_letter(&self, c: char) -> bool {
        // Tatweel sits inside the base letter block but is never a letter
        // once we have been told to strip it.
        if self.strip_tatweel && c == TATWEEL {
            return false;
        }
        self.arabic_letter_ranges.iter().any(|r| r.contains(c))
    }

    fn is_diacritic(&self, c: char) -> bool {
        self.diacritic_codepoints.contains(&(c as u32)) || (self.strip_tatweel && c == TATWEEL)
    }

    /// Removes diacritic codepoints (and tatweel when configured), keeping
    /// every other codepoint in order.
    pub fn strip_diacritics(&self, text: &str) -> String {
        text.chars().filter(|&c| !self.is_diacritic(c)).collect()
    }

    /// Replaces every codepoint that is not an Arabic letter, ASCII letter,
    /// digit or whitespace with a single space.
    pub fn remove_special_symbols(&self, text: &str) -> String {
        text.chars()
            .map(|c| {
                if self.is_arabic_letter(c) || c.is_ascii_alphabetic() || is_digit(c) || c.is_whitespace() {
                    c
                } else {
                    ' '
                }
            })
            .collect()
    }

    /// Drops every word without an Arabic letter and rejoins the rest with
    /// single spaces.
    ///
    /// Words are delimited by whitespace and by any codepoint that is
    /// neither an Arabic letter nor a digit, so a Latin run glued to an
    /// Arabic word is cut off rather than carried along. Digits survive
    /// only inside a word that has an Arabic letter.
    pub fn remove_non_arabic(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        for word in text.split(|c: char| !(self.is_arabic_letter(c) || is_digit(c))) {
            if word.chars().any(|c| self.is_arabic_letter(c)) {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(word);
            }
        }
        out
    }

    pub fn clean(&self, text: &str) -> String {
        let text = self.strip_diacritics(text);
        let text = self.remove_special_symbols(&text);
        let text = collapse_repeats(&text, self.collapse_repeats_to);
        let text = self.remove_non_arabic(&text);
        normalize_whitespace(&text)
    }

    /// Cleans and tokenizes in one go.
    pub fn tokens(&self, text: &str) -> Vec<String> {
        tokenize(&self.clean(text))
    }
}

/// Shortens every maximal run of one codepoint longer than `max_run` to
/// exactly `max_run` codepoints.
///
/// # Panics
///
/// Panics if `max_run` is zero.
pub fn collapse_repeats(text: &str, max_run: usize) -> String {
    assert!(max_run >= 1, "max_run must be at least 1");
    let mut out = String::with_capacity(text.len());
    let mut prev = None;
    let mut run = 0;
    for c in text.chars() {
        if Some(c) == prev {
            run += 1;
        } else {
            prev = Some(c);
            run = 1;
        }
        if run <= max_run {
            out.push(c);
        }
    }
    out
}

/// Collapses whitespace to single spaces and trims both ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Unigram tokenization: split on whitespace, no empty tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_owned).collect()
}
