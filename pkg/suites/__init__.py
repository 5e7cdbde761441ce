# suites/__init__.py
"""Verification suites; each module registers itself through setup(runner)"""
