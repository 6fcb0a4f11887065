"""Domain models shared across the workbench."""
