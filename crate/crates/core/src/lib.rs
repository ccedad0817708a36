pub mod dktriple;
pub mod exactla;
pub mod fincat;
pub mod chains;
pub mod diagram;
pub mod dkequiv;
pub mod generators;
