"""Resources initialization."""
