pub mod datafile;
pub mod display;
pub mod drt;
pub mod engine;
pub mod gen;
pub mod params;
pub mod reducer;
pub mod semmap;
pub mod storage;
pub mod syntax;
pub mod term;
pub mod translate;
