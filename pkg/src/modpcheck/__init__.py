"""modpcheck: exact-arithmetic verification of weight-combinatorics,
truncated Iwasawa-algebra, and etale-module matrix identities at desk scale."""

__version__ = "0.1.0"
