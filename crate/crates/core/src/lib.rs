pub mod domains;
pub mod encoding;
pub mod features;
pub mod pipeline;
pub mod policy;
pub mod statespace;
pub mod strips;
