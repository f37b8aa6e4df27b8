"""Builder module tests."""
