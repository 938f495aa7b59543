import pytest

import tcred


@pytest.fixture(scope="module")
def issuer():
    params = tcred.setup(3)
    sks, vks = tcred.ttp_keygen(params, 2, 3)
    return params, sks, vks, tcred.aggregate_keys(vks[:2])


def issue(issuer, values, public=()):
    params, sks, _, _ = issuer
    prepared = tcred.prepare_blind_sign(params, values, list(public))
    partials = [prepared.unblind(tcred.blind_sign(params, sk, prepared.request)) for sk in sks[1:]]
    return tcred.aggregate_credentials(partials)


def test_issue_show_verify(issuer):
    params, _, _, vk = issuer
    values = [11, 1990, tcred.ORDER - 1]
    cred = issue(issuer, values, public=[2])
    assert len(cred) == 98
    assert tcred.verify_signature(params, vk, cred, values)

    show = tcred.prove_cred(params, vk, cred, values, reveal=[2])
    assert tcred.verify_cred(params, vk, show, require=[2])
    assert tcred.disclosed(show) == {2: 1990}
    assert not tcred.verify_cred(params, vk, show, require=[1])


def test_aggregate_key_is_subset_independent(issuer):
    params, _, vks, vk = issuer
    other = tcred.aggregate_keys([vks[2], vks[0]])
    values = [5, 6, 7]
    cred = issue(issuer, values)
    assert tcred.verify_signature(params, vk, cred, values)
    assert tcred.verify_signature(params, other, cred, values)


def test_tampered_show_is_rejected(issuer):
    params, _, _, vk = issuer
    show = bytearray(tcred.prove_cred(params, vk, issue(issuer, [1, 2, 3]), [1, 2, 3]))
    show[10] ^= 1
    assert not tcred.verify_cred(params, vk, bytes(show))
    assert not tcred.verify_cred(params, vk, b"")


def test_errors(issuer):
    params, sks, _, _ = issuer
    with pytest.raises(ValueError):
        tcred.prepare_blind_sign(params, [tcred.ORDER, 0, 0])
    with pytest.raises(ValueError):
        tcred.prepare_blind_sign(params, [-1, 0, 0])
    with pytest.raises(tcred.WireError):
        tcred.blind_sign(params, sks[0], b"\x01\x02")
    other = tcred.prepare_blind_sign(tcred.setup(3), [1, 2, 3])
    request = bytearray(other.request)
    request[-1] ^= 1
    with pytest.raises((tcred.ProtocolError, tcred.WireError)):
        tcred.blind_sign(params, sks[0], bytes(request))


def test_params_digest():
    assert tcred.params_digest(tcred.setup(2)) == tcred.params_digest(tcred.setup(2))
    assert tcred.params_digest(tcred.setup(2)) != tcred.params_digest(tcred.setup(3))


def test_bench():
    mean, stddev = tcred.bench("unblind", 3)
    assert mean > 0 and stddev >= 0
    with pytest.raises(ValueError):
        tcred.bench("dance", 1)
