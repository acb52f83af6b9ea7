"""Optional compiled exploration backend."""
