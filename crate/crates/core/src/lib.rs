//! Stochastic second-order-cone AC optimal power flow for hybrid AC/DC grids
//! with VSC-MTDC links and FACTS devices, solved monolithically or by a
//! scenario-partitioned Benders decomposition.

pub mod acopf;
pub mod conic;
pub mod grid;
pub mod mbda;
pub mod stochastic;
pub mod wind;

#[cfg(test)]
mod testing;
