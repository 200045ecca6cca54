# Impurity Entanglement
# =====================

__version__ = "1.0.0"

from .main import main, run

__all__ = ['main', 'run']
