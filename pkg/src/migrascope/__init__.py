"""Architecture-level compatibility analysis for moving NFT collections
between blockchains."""

__version__ = "0.1.0"
