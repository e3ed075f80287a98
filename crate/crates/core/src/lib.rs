pub mod analysis;
pub mod fol;
pub mod oracle;
pub mod registry;
pub mod syntax;
pub mod translation;
pub mod verification;
