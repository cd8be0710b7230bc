"""
pathpart - Test Suite

This package contains pytest-based tests for the pathpart library.
"""
