"""Layer-combination classifier: model, losses, data and training."""
