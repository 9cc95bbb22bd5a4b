//! Self-contained numeric kernels backing the model modules.
//!
//! Nothing here knows about model parameters; each submodule is a small,
//! independently tested routine with explicit tolerances.

pub(crate) mod cubic;
pub(crate) mod optim;
pub(crate) mod quad;
pub(crate) mod rng;
pub(crate) mod roots;
pub(crate) mod special;
pub(crate) mod tridiag;
