"""transfid: translation-fidelity evaluation for paired 3D volumes.

Loads co-registered volume pairs, computes MAE/MSE/SSIM/PSNR, extracts a
186-entry standardized radiomic feature vector per (patient, source), and
classifies each feature's cross-cohort concordance into three discovery
groups.
"""

from .volume import RoiMask, Volume3D

__version__ = "0.1.0"

__all__ = ["RoiMask", "Volume3D", "__version__"]
