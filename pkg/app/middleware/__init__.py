"""
Middleware package.
This package contains the run context and the error-to-exit-code mapping.
"""

from .error_handler import EXIT_OK, error_document, guarded
from .run_context import RunContext, run_scope

__all__ = ['EXIT_OK', 'error_document', 'guarded', 'RunContext', 'run_scope']
