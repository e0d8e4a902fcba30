"""
Semiannulus Regularity Toolkit application package.
This package contains all the core application modules.
"""