pub mod exact;
pub mod poly;
pub mod quadrature;
pub mod real;
pub mod roots;
pub mod series;
pub mod transforms;
pub mod verify;
