"""Hamilton-Jacobi reachability: grids, solver and value functions."""
