"""Multi-source network error correction against a z-link adversary.

Modules: ``ff_tower`` (extension-field towers), ``matrix`` (exact linear
algebra), ``rank_metric`` (Gabidulin codes), ``subspace`` (subspace and
injection distances), ``netsim`` (random linear network coding with an
adversary), ``codec_side_channel`` and ``codec_omniscient`` (the two
codes), ``capacity`` (rate regions), ``oracle`` (brute-force reference
decoders), ``experiments`` and ``cli``.
"""
__version__ = "0.1.0"
