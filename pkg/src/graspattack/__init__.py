"""Adversarial cage deformations that weaken a fixed robotic grasp."""

__version__ = "0.1.0"
