# Service layer for the geometric computations
