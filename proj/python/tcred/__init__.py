"""Threshold-issued anonymous credentials on BLS12-381.

Objects cross the boundary as wire envelopes (bytes); attributes are ints
below the group order.
"""

from ._tcred import (
    Prepared,
    ProtocolError,
    WireError,
    aggregate_credentials,
    aggregate_keys,
    bench,
    blind_sign,
    disclosed,
    params_digest,
    prepare_blind_sign,
    prove_cred,
    setup,
    ttp_keygen,
    verify_cred,
    verify_signature,
)

# Group order of BLS12-381.
ORDER = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001

__all__ = [
    "ORDER",
    "Prepared",
    "ProtocolError",
    "WireError",
    "aggregate_credentials",
    "aggregate_keys",
    "bench",
    "blind_sign",
    "disclosed",
    "params_digest",
    "prepare_blind_sign",
    "prove_cred",
    "setup",
    "ttp_keygen",
    "verify_cred",
    "verify_signature",
]
