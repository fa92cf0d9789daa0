//! Block-compressed Web graphs with random access to adjacency lists.
//!
//! Two codecs are provided. [`ssl`] describes each list against its
//! predecessor with copy flags and gap-coded residuals, closing a block when
//! the residual buffer reaches a byte threshold. [`lm`] merges fixed groups of
//! `h` lists into one long list plus per-value membership windows. Both
//! DEFLATE-compress every block separately, and [`CompressedGraph`] stores the
//! blocks behind an index so a single list decodes one block only.

pub mod bench;
pub mod byte_code;
pub mod container;
pub mod error;
pub mod graph;
pub mod lm;
pub mod ssl;
pub mod stats;
pub mod synthetic;

pub use byte_code::{ByteCode, CodeVariant};
pub use container::{Codec, CompressedGraph};
pub use error::{Error, ParseErrorKind, Result};
pub use graph::{parse_text, to_text, write_text, Graph, NodeId};
pub use lm::{FlagEncoding, LmParams};
pub use ssl::{FlagCount, SslParams};
pub use synthetic::{generate_synthetic, SyntheticParams};
