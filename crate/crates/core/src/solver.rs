//! Semidiscrete optimal transport by damped dual ascent.
