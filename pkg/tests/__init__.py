"""
Tests for polar-reading
"""
