"""rabuild: right-angled buildings, Davis complexes and wall solvers."""
