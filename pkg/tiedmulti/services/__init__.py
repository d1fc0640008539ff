"""Experiment orchestration on top of the model, decoding and metrics layers."""
