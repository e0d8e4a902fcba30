"""
Task routes package.
This package contains one module per scenario task, each with its own TaskRouter.
"""

from . import bounds, certify, dilatation, gallery, integrate, modulus, sweep

__all__ = ['bounds', 'certify', 'dilatation', 'gallery', 'integrate', 'modulus', 'sweep']
