"""
Tests package.
This package contains all unit and integration tests for the toolkit.
"""