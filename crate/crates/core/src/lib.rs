pub mod algebra;
pub mod cones;
pub mod eta;
pub mod foliation;
pub mod numeric;
pub mod recheck;
pub mod theorems;
pub mod variety;
