//! Multifractal analysis of grayscale images.
//!
//! The crate turns an image into a normalized box measure, estimates its
//! multifractal spectra by two independent routes (box moments and pointwise
//! Hölder exponents), segments the image by exponent or spectrum value, and
//! classifies labeled feature sets with a pooled-covariance linear
//! discriminant under leave-one-out cross-validation.
//!
//! Module map:
//!
//! * [`measures`] – grayscale images, dyadic cropping, image → measure.
//! * [`cascade`] – multiplicative cascades with closed-form spectra.
//! * [`moments`] – partition functions, τ(q), D(q), direct and Legendre f(α).
//! * [`holder`] – Hölder exponent maps, large-deviation and Hausdorff spectra.
//! * [`features`] – the scalar feature vector extracted per image.
//! * [`segment`] – selection of pixels by α or f(α), box-counting dimension.
//! * [`stats`] – one-way ANOVA, linear discriminant, LOOCV.
//! * [`formats`] – PGM/PNG decoding and the binary/text export formats.

pub mod cascade;
pub mod error;
pub mod features;
pub mod formats;
pub mod holder;
pub mod measures;
pub mod moments;
pub mod pipeline;
pub mod regression;
pub mod segment;
pub mod stats;

pub use error::{Error, Result};
pub use measures::{BitDepth, GrayImage, MeasureGrid, MeasureKind};
