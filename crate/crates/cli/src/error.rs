use bwtx_core::session::SessionError;
use bwtx_core::{AnalysisError, OrderingError, TextError, TransformError, ViewError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    View(#[from] ViewError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    /// 2 for bad input or arguments, 1 for failures while doing the work.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Session(SessionError::WriteFailure(_)) => 1,
            _ => 2,
        }
    }

    /// Short error name, such as `EmptyText`.
    pub fn code(&self) -> String {
        let debug = match self {
            CliError::Usage(_) => return "Usage".into(),
            CliError::Io { .. } => return "Io".into(),
            CliError::Text(e) => format!("{e:?}"),
            CliError::Ordering(e) => format!("{e:?}"),
            CliError::Transform(TransformError::Ordering(e)) => format!("{e:?}"),
            CliError::Transform(e) => format!("{e:?}"),
            CliError::View(e) => format!("{e:?}"),
            CliError::Analysis(e) => format!("{e:?}"),
            CliError::Session(e) => format!("{e:?}"),
        };
        debug
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or_default()
            .to_string()
    }
}
