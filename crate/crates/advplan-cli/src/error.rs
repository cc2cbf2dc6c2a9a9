use std::fmt;
use std::process::ExitCode;

/// A categorized CLI failure. The category is machine-readable (it becomes
/// both the stderr tag and the exit code); the message is for humans.
#[derive(Debug)]
pub struct CliError {
    pub category: Category,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    /// Bad flag combinations or values clap cannot catch on its own.
    Usage,
    /// Input files that do not parse: PDDL, mazes, tables, configs, plans.
    Parse,
    /// The instance has no solution (or the attack needs one and it is gone).
    Unsolvable,
    /// Filesystem trouble.
    Io,
    /// A search or enumeration bound was exceeded before an answer.
    Budget,
    /// Anything else.
    Other,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Usage => "usage",
            Category::Parse => "parse",
            Category::Unsolvable => "unsolvable",
            Category::Io => "io",
            Category::Budget => "budget",
            Category::Other => "other",
        }
    }

    pub fn exit_code(self) -> ExitCode {
        ExitCode::from(match self {
            Category::Other => 1,
            Category::Usage => 2,
            Category::Parse => 3,
            Category::Unsolvable => 4,
            Category::Io => 5,
            Category::Budget => 6,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.category.name(), self.message)
    }
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> CliError {
        CliError { category: Category::Usage, message: message.into() }
    }

    pub fn parse(message: impl fmt::Display) -> CliError {
        CliError { category: Category::Parse, message: message.to_string() }
    }

    pub fn unsolvable(message: impl Into<String>) -> CliError {
        CliError { category: Category::Unsolvable, message: message.into() }
    }

    pub fn budget(message: impl Into<String>) -> CliError {
        CliError { category: Category::Budget, message: message.into() }
    }

    pub fn other(message: impl fmt::Display) -> CliError {
        CliError { category: Category::Other, message: message.to_string() }
    }
}

/// Read a file with the path folded into the error message.
pub fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError {
        category: Category::Io,
        message: format!("{}: {e}", path.display()),
    })
}

/// Write a file with the path folded into the error message.
pub fn write_file(path: &std::path::Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError {
        category: Category::Io,
        message: format!("{}: {e}", path.display()),
    })
}
