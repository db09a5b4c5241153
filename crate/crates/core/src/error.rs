use thiserror::Error;

/// Errors surfaced by the scan pipeline and its modules.
#[derive(Debug, Error)]
pub enum ScanError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("corrupt input at byte offset {offset}: {detail}")]
    CorruptInput { offset: u64, detail: String },

    #[error("MRT frame resync failed at byte offset {offset}: {detail}")]
    FrameResync { offset: u64, detail: String },

    #[error("no WHOIS server known for TLD .{0}")]
    UnknownWhoisServer(String),

    #[error("WHOIS transient failure for {domain} after {retries} retries: {detail}")]
    WhoisTransient {
        domain: String,
        retries: u32,
        detail: String,
    },

    #[error("WHOIS server {server} signalled rate limiting")]
    WhoisRateLimited { server: String },

    #[error("unparseable expiry date in WHOIS line: {line:?}")]
    ExpiryParse { line: String },

    #[error("expiry date {0} outside sane range [1985, 2200]")]
    ExpiryOutOfRange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("series contract violated: {0}")]
    SeriesContract(String),

    #[error("output directory is locked by another run: {0}")]
    OutputLocked(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, ScanError>;
