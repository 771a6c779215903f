"""Multi-task neural retrieval of cloud properties from simulated imager pixels.

Subpackages:
    engine     reverse-mode autodiff core, optimizer, gradient checking
    models     network variants, composite loss, prediction, training
    data       sensor registry, synthetic pixel generator, CSV I/O, splits
    metrics    classification / regression / goodness-fraction metrics
    selection  cross-validation statistics and model-selection scores
"""

__version__ = "0.1.0"

from . import engine, models, data, metrics, selection  # noqa: F401
