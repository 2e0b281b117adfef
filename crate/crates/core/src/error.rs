use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("letter a{index} is outside the alphabet a0..a{max}")]
    LetterOutOfRange { index: usize, max: usize },

    #[error("alphabets of more than 255 letters are not supported (requested degree {0})")]
    AlphabetTooLarge(usize),

    #[error("shuffle exponent requires a polynomial without constant term, found {0}")]
    ConstantTerm(String),

    #[error("part {degree} is not homogeneous: word {word} has length {len}")]
    NotHomogeneous {
        degree: usize,
        word: String,
        len: usize,
    },

    #[error("cannot parse polynomial: {0}")]
    Parse(String),

    #[error("truncation order {order} exceeds the guard {guard}")]
    GuardExceeded { order: usize, guard: usize },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("alphabet mismatch: expected {expected} letters, found {found}")]
    AlphabetMismatch { expected: usize, found: usize },

    #[error("word of length {len} exceeds the word-by-word evaluation limit {limit}")]
    WordTooLong { len: usize, limit: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("reference integrator blew up near t = {time} (|x| > {ceiling}); last safe time {last_safe}")]
    BlowUp {
        time: f64,
        last_safe: f64,
        ceiling: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
