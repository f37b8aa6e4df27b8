"""Test suite for dist-pagerank."""
