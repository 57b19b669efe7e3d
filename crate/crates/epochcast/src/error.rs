use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, field `{field}`: {message}")]
    Format { line: u64, field: String, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] epochcast_core::Error),
}

impl Error {
    pub(crate) fn format(line: u64, field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Maps a csv writer or reader error, keeping its line when it has one.
pub(crate) fn from_csv(err: csv::Error, what: &str) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io {
            path: what.into(),
            source: e,
        },
        other => Error::format(line, what, format!("{other:?}")),
    }
}
