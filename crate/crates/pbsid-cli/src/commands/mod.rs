pub mod identify;
pub mod preprocess;
pub mod residuals;
pub mod simulate;
