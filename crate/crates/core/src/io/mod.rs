//! File formats: the CSMAT1 binary matrix format, CSV helpers and 8-bit PGM.

pub mod csmat;
pub mod csv;
pub mod pgm;

pub use csmat::{read_csmat, read_csmat_file, write_csmat, write_csmat_file};
pub use pgm::{read_pgm, read_pgm_file, write_pgm, write_pgm_file, GrayImage};
