//! Complexes of finite groups over scwols, their links, covolumes and covers.

pub mod cli;
pub mod cog;
pub mod covolume;
pub mod cover;
pub mod coxeter;
pub mod families;
pub mod groups;
pub mod links;
