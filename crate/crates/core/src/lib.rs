pub mod spin_chsh;
pub mod wavepacket;
pub mod cluster_field;
pub mod experiment;
pub mod cli;
