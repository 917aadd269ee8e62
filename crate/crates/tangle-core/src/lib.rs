pub mod asymptotics;
pub mod compose;
pub mod error;
pub mod oracle;
pub mod pattern;
pub mod poly;
pub mod renorm;
pub mod series;
pub mod table;
pub mod tm;

pub use error::{Error, Result};

/// Guide chapters, compiled here so their examples run as doc-tests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    pub struct Overview;
    #[doc = include_str!("../../../book/src/series.md")]
    pub struct Series;
    #[doc = include_str!("../../../book/src/enumeration.md")]
    pub struct Enumeration;
    #[doc = include_str!("../../../book/src/oracle.md")]
    pub struct Oracle;
    #[doc = include_str!("../../../book/src/renormalization.md")]
    pub struct Renormalization;
    #[doc = include_str!("../../../book/src/asymptotics.md")]
    pub struct Asymptotics;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
