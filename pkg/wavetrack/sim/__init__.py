"""Closed-loop simulation of the AUV in waves."""
