"""Identity-document image classification.

Classifies a document photo against a small enrolled class set by fusing
two classifiers: scale-invariant keypoint matching (with z-score plus
logistic-regression confidence calibration) and OCR keyword matching.
"""

__version__ = "0.1.0"
