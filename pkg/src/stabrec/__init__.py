"""stabrec: exact stable-category computations for self-injective bound quiver algebras."""

from stabrec.gf import Field

__version__ = "0.1.0"

__all__ = ["Field", "__version__"]
