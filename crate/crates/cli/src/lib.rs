//! Command line front end and HTTP session service for the workbench.

pub mod api;
pub mod commands;
pub mod view;
