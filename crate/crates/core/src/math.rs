//! Float math backend: `std` intrinsics when available, `libm` otherwise.
//!
//! Only the functions the crate actually needs are routed through here, so
//! the `no_std` build stays honest about its math surface.

#![allow(dead_code)]

macro_rules! forward {
    ($($name:ident),* $(,)?) => {
        $(
            #[cfg(feature = "std")]
            #[inline(always)]
            pub(crate) fn $name(x: f64) -> f64 {
                f64::$name(x)
            }
            #[cfg(not(feature = "std"))]
            #[inline(always)]
            pub(crate) fn $name(x: f64) -> f64 {
                libm::$name(x)
            }
        )*
    };
}

forward!(sin, cos, tan, asin, acos, atan, sqrt, exp, floor);

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn abs(x: f64) -> f64 {
    x.abs()
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn ln(x: f64) -> f64 {
    x.ln()
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn log2(x: f64) -> f64 {
    x.log2()
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    f64::atan2(y, x)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    f64::hypot(x, y)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    x.powi(n)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    x.powf(y)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
