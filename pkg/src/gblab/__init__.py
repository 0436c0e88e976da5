"""gblab: Birkhoff-sum statistics of rationals under the Gauss map,
transfer-operator numerics, and stable-limit-law experiments."""

__version__ = "0.1.0"
