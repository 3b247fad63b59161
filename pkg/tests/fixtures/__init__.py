"""Reference values and configuration documents for polar-reading tests"""
