"""Training loops, losses, optimizers, checkpoint averaging and distillation."""
