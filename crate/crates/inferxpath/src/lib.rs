//! Filesystem and network side of inferxpath: HTML parsing, sidecar and
//! manifest formats, the page fetcher, request files and CSV output.

pub mod cli;
pub mod fetcher;
pub mod html;
pub mod manifest;
pub mod registry;
pub mod request;
pub mod sidecar;
pub mod table;
