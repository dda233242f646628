pub mod arith;
pub mod gamma;
pub mod quad;
pub mod special;
pub mod sum;

pub use num_complex::Complex64 as C64;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}
