"""Invariant-based public-key cryptosystem over diagonalizable matrix groups, with attacks."""
from .cryptosystem import (Ciphertext, KeyPair, PrivateKey, PublicKey, decrypt, encrypt,
                           expansion_ratio, keygen_ff_cyclic, keygen_ff_noncyclic,
                           keygen_finite_ring, keygen_number_ring)
from .errors import (AttackFailed, DomainError, EvaluationError, IcryptError, InvalidCiphertextError,
                     InvalidKeyError, NotFoundError, ParameterError, ResourceError,
                     SingularMatrixError, UnsupportedRingError)
from .rings import ExtField, PrimeField, QuadField, ResidueRing

__version__ = "0.1.0"

__all__ = [
    "Ciphertext", "KeyPair", "PrivateKey", "PublicKey", "decrypt", "encrypt", "expansion_ratio",
    "keygen_ff_cyclic", "keygen_ff_noncyclic", "keygen_finite_ring", "keygen_number_ring",
    "AttackFailed", "DomainError", "EvaluationError", "IcryptError", "InvalidCiphertextError",
    "InvalidKeyError", "NotFoundError", "ParameterError", "ResourceError", "SingularMatrixError",
    "UnsupportedRingError", "ExtField", "PrimeField", "QuadField", "ResidueRing",
]
