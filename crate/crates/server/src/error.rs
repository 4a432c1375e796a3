use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use bwtx_core::session::SessionError;
use bwtx_core::{AnalysisError, OrderingError, TextError, TransformError, ViewError};
use serde::Serialize;

/// Error body: `{"code": ..., "message": ...}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: &'a str,
    message: &'a str,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BadRequest", message)
    }

    pub fn session_not_found(id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "NotFound",
            format!("no session {id}"),
        )
    }

    pub fn transform_not_found(id: u64) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "NotFound",
            format!("no transform {id}"),
        )
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            code: self.code,
            message: &self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<TextError> for ApiError {
    fn from(e: TextError) -> Self {
        let (status, code) = match e {
            TextError::EmptyText => (StatusCode::BAD_REQUEST, "EmptyText"),
            TextError::NoEndMarkerAvailable => {
                (StatusCode::UNPROCESSABLE_ENTITY, "NoEndMarkerAvailable")
            }
            TextError::EndMarkerInText { .. } => {
                (StatusCode::UNPROCESSABLE_ENTITY, "EndMarkerInText")
            }
        };
        Self::new(status, code, e.to_string())
    }
}

impl From<OrderingError> for ApiError {
    fn from(e: OrderingError) -> Self {
        let code = match e {
            OrderingError::DuplicateCharacter(_) => "DuplicateCharacter",
            OrderingError::MissingCharacters(_) => "MissingCharacters",
            OrderingError::UnknownCharacter(_) => "UnknownCharacter",
            OrderingError::MalformedSpec(_) => "MalformedSpec",
            OrderingError::EndMarkerInOrdering(_) => "EndMarkerInOrdering",
            OrderingError::PresetUnavailable(_) => "PresetUnavailable",
            OrderingError::UnknownPreset(_) => "UnknownPreset",
        };
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, e.to_string())
    }
}

impl From<TransformError> for ApiError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Ordering(o) => o.into(),
            TransformError::TooLarge { .. } => {
                Self::new(StatusCode::PAYLOAD_TOO_LARGE, "TextTooLarge", e.to_string())
            }
            TransformError::InvalidLastColumn(_) => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "CacheInvalid",
                e.to_string(),
            ),
        }
    }
}

impl From<ViewError> for ApiError {
    fn from(e: ViewError) -> Self {
        match e {
            ViewError::OutOfBounds { .. } => Self::new(
                StatusCode::RANGE_NOT_SATISFIABLE,
                "OutOfBounds",
                e.to_string(),
            ),
            ViewError::EmptyWindow => {
                Self::new(StatusCode::BAD_REQUEST, "InvalidWindow", e.to_string())
            }
            ViewError::TextMismatch => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "TextMismatch",
                e.to_string(),
            ),
        }
    }
}

impl From<AnalysisError> for ApiError {
    fn from(e: AnalysisError) -> Self {
        let (status, code) = match e {
            AnalysisError::CycleDetected(_) => (StatusCode::CONFLICT, "CycleDetected"),
            AnalysisError::EndMarkerConstraint(_) => {
                (StatusCode::UNPROCESSABLE_ENTITY, "EndMarkerConstraint")
            }
            AnalysisError::UnknownCharacter(_) => {
                (StatusCode::UNPROCESSABLE_ENTITY, "UnknownCharacter")
            }
            AnalysisError::SameCharacter(_) => (StatusCode::UNPROCESSABLE_ENTITY, "SameCharacter"),
            AnalysisError::InvalidSection { .. } => {
                (StatusCode::RANGE_NOT_SATISFIABLE, "OutOfBounds")
            }
        };
        Self::new(status, code, e.to_string())
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::CorruptFile(_) => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "CorruptFile",
                e.to_string(),
            ),
            SessionError::VersionUnsupported(_) => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "VersionUnsupported",
                e.to_string(),
            ),
            SessionError::WriteFailure(_) => Self::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "WriteFailure",
                e.to_string(),
            ),
            SessionError::UnknownTransform(id) => Self::transform_not_found(id),
            SessionError::RowOutOfRange { .. } => Self::new(
                StatusCode::RANGE_NOT_SATISFIABLE,
                "OutOfBounds",
                e.to_string(),
            ),
            SessionError::Text(t) => t.into(),
            SessionError::Ordering(o) => o.into(),
            SessionError::Transform(t) => t.into(),
        }
    }
}
