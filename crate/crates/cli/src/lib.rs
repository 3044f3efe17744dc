pub mod syntax;
pub mod pipeline;
pub mod report;
pub mod app;
