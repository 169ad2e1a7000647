//! Exact combinatorial kernels for the classification of strong L-spaces.
//!
//! Everything here is exact integer / rational arithmetic; there is no
//! floating point anywhere in the crate. The four kernels are:
//!
//! - [`signmat`]: sign and integer matrix algebra (effectiveness, maximality,
//!   equivalence classes under the row/column group, exhaustive enumeration),
//! - [`contfrac`]: positive rationals, continued fraction expansions, mediant
//!   predecessors and the nested R-value, with exhaustive sweep verifiers,
//! - [`surgery`]: alternatingly weighted trees, framed links, first homology
//!   via surgery presentation matrices, blow-ups and slope reduction,
//! - [`linkdiag`]: alternating link diagrams as planar maps, smoothing, the
//!   diagram containment order, and Goeritz determinants.

pub mod contfrac;
pub mod linkdiag;
pub mod signmat;
pub mod surgery;
