"""Reversible data hiding in encrypted images via PE bit-plane rearrangement."""
