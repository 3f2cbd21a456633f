pub mod control;
pub mod expr;
pub mod integral;
pub mod lipschitz;
pub mod numeric;
pub mod sample;
pub mod verdict;
