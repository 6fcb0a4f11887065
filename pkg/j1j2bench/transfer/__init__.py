"""Six-vertex R-matrix, transfer matrices and zero-root extraction."""
