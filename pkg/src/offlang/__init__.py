"""offlang: hierarchical offensive-language classification toolkit.

Corpus handling, feature extraction, from-scratch neural and linear
classifiers, hierarchical evaluation, error analysis, and a two-annotator
annotation service.
"""

__version__ = "0.1.0"
