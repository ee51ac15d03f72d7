//! Part-name label parsing.
//!
//! Part names carry their labels as underscore-delimited tokens, e.g.
//! `motor_manual_value` or `base_plate_base`. Tokens are matched
//! case-insensitively; anything that is not a label is kept in
//! [`ParsedLabels::unknown`] so callers can surface it.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::ModelError;

/// Task label linking a part to the kind of operation that removes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskLabel {
    Screw,
    Bolt,
    Nut,
    Plate,
    Graspable,
    Manual,
}

impl TaskLabel {
    pub const ALL: [TaskLabel; 6] = [
        TaskLabel::Screw,
        TaskLabel::Bolt,
        TaskLabel::Nut,
        TaskLabel::Plate,
        TaskLabel::Graspable,
        TaskLabel::Manual,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskLabel::Screw => "screw",
            TaskLabel::Bolt => "bolt",
            TaskLabel::Nut => "nut",
            TaskLabel::Plate => "plate",
            TaskLabel::Graspable => "graspable",
            TaskLabel::Manual => "manual",
        }
    }

    /// Screws and bolts fasten other parts together.
    pub fn is_fixing(self) -> bool {
        matches!(self, TaskLabel::Screw | TaskLabel::Bolt)
    }
}

impl fmt::Display for TaskLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskLabel {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskLabel::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or(())
    }
}

/// Result of [`parse_labels`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParsedLabels {
    /// `None` only for ignore-labeled parts, which never enter a sequence.
    pub task: Option<TaskLabel>,
    pub priority: bool,
    pub base: bool,
    pub ignore: bool,
    /// Tokens that are not labels (usually the descriptive part of the name).
    pub unknown: Vec<String>,
}

/// Splits `name` on underscores and collects the label tokens.
///
/// When several task tokens occur, `manual` wins (a part that needs a human
/// stays manual whatever its shape); otherwise the first task token is used.
pub fn parse_labels(name: &str) -> Result<ParsedLabels, ModelError> {
    if name.trim().is_empty() {
        return Err(ModelError::EmptyPartName);
    }
    let mut out = ParsedLabels::default();
    for token in name.split('_').filter(|t| !t.is_empty()) {
        if let Ok(task) = token.parse::<TaskLabel>() {
            out.task = match out.task {
                None => Some(task),
                Some(_) if task == TaskLabel::Manual => Some(task),
                keep => keep,
            };
        } else if token.eq_ignore_ascii_case("value") {
            out.priority = true;
        } else if token.eq_ignore_ascii_case("base") {
            out.base = true;
        } else if token.eq_ignore_ascii_case("ignore") {
            out.ignore = true;
        } else {
            out.unknown.push(token.to_string());
        }
    }
    if out.task.is_none() && !out.ignore {
        return Err(ModelError::MissingTaskLabel {
            name: name.to_string(),
        });
    }
    Ok(out)
}
