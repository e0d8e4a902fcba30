"""
Models package.
This package contains the pydantic models of fields, semiannuli, meshes,
quadrature results, certificates and scenarios.
"""

from .field import BeltramiField, DilatationSample, Domain
from .semiannulus import SemiannulusSpec, SpecKind

__all__ = ['BeltramiField', 'DilatationSample', 'Domain', 'SemiannulusSpec', 'SpecKind']
