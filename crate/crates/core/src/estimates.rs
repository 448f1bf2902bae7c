//! Pointwise estimate checks.
