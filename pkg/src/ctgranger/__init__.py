"""Granger causality for subsampled continuous-time autoregressive processes."""
