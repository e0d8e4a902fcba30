"""
Services package.
This package contains the numerical services of the toolkit.
"""

from .certify_service import CertifyService
from .dilatation_service import DilatationService
from .field_service import FieldService
from .gallery_service import GalleryService
from .modulus_service import ModulusService
from .quadrature_service import QuadratureService

__all__ = ['CertifyService', 'DilatationService', 'FieldService', 'GalleryService',
           'ModulusService', 'QuadratureService']
