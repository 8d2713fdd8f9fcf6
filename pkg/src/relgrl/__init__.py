"""Generalized relational Q-learning with description-logic state abstractions."""
