"""Self-contained crypto primitives used as the independent oracle side of
the dual-route checks: pure-Python secp256k1 ECDSA (with RFC 6979
deterministic nonces), PKCS#1 v1.5 RSA-SHA256 verification, and a
long-division base58 encoder.  Only hashlib/hmac are used, so none of the
code paths shared with the package implementation are exercised here.
Desk-scale performance only.
"""

import hashlib
import hmac

# secp256k1 domain parameters
P = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F
N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
GY = 0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8
G = (GX, GY)


def _inv(a: int, m: int) -> int:
    return pow(a, -1, m)


def point_add(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    x1, y1 = p1
    x2, y2 = p2
    if x1 == x2 and (y1 + y2) % P == 0:
        return None
    if p1 == p2:
        lam = (3 * x1 * x1) * _inv(2 * y1, P) % P
    else:
        lam = (y2 - y1) * _inv((x2 - x1) % P, P) % P
    x3 = (lam * lam - x1 - x2) % P
    y3 = (lam * (x1 - x3) - y1) % P
    return (x3, y3)


def scalar_mult(k: int, point):
    result = None
    addend = point
    while k:
        if k & 1:
            result = point_add(result, addend)
        addend = point_add(addend, addend)
        k >>= 1
    return result


def decompress_point(data: bytes):
    """SEC1 compressed point (33 bytes) to affine coordinates."""
    if len(data) != 33 or data[0] not in (2, 3):
        raise ValueError("not a compressed secp256k1 point")
    x = int.from_bytes(data[1:], "big")
    y_sq = (pow(x, 3, P) + 7) % P
    y = pow(y_sq, (P + 1) // 4, P)
    if pow(y, 2, P) != y_sq:
        raise ValueError("point not on curve")
    if y % 2 != data[0] % 2:
        y = P - y
    return (x, y)


def rfc6979_nonce(private: int, h1: bytes) -> int:
    """Deterministic ECDSA nonce per RFC 6979 (SHA-256, qlen = hlen = 256)."""
    def hmac_sha256(key, msg):
        return hmac.new(key, msg, hashlib.sha256).digest()

    x_octets = private.to_bytes(32, "big")
    z = int.from_bytes(h1, "big") % N
    h1_octets = z.to_bytes(32, "big")
    v = b"\x01" * 32
    k = b"\x00" * 32
    k = hmac_sha256(k, v + b"\x00" + x_octets + h1_octets)
    v = hmac_sha256(k, v)
    k = hmac_sha256(k, v + b"\x01" + x_octets + h1_octets)
    v = hmac_sha256(k, v)
    while True:
        v = hmac_sha256(k, v)
        candidate = int.from_bytes(v, "big")
        if 1 <= candidate < N:
            return candidate
        k = hmac_sha256(k, v + b"\x00")
        v = hmac_sha256(k, v)


def ecdsa_sign_deterministic(private: int, h1: bytes) -> tuple:
    """(r, s) with the RFC 6979 nonce; no low-s normalization."""
    z = int.from_bytes(h1, "big")
    k = rfc6979_nonce(private, h1)
    while True:
        point = scalar_mult(k, G)
        r = point[0] % N
        if r != 0:
            s = _inv(k, N) * (z + r * private) % N
            if s != 0:
                return r, s
        k = (k + 1) % N  # astronomically unlikely; keeps the loop total


def ecdsa_verify(public_point, h1: bytes, r: int, s: int) -> bool:
    if not (1 <= r < N and 1 <= s < N):
        return False
    z = int.from_bytes(h1, "big")
    w = _inv(s, N)
    u1 = z * w % N
    u2 = r * w % N
    point = point_add(scalar_mult(u1, G), scalar_mult(u2, public_point))
    if point is None:
        return False
    return point[0] % N == r


_B58 = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"


def b58encode_longdiv(data: bytes) -> str:
    """Base58 via repeated byte-array long division (deliberately a
    different algorithm from any big-int implementation)."""
    digits = []
    for byte in data:
        carry = byte
        for i in range(len(digits)):
            carry += digits[i] << 8
            digits[i] = carry % 58
            carry //= 58
        while carry:
            digits.append(carry % 58)
            carry //= 58
    pad = 0
    for byte in data:
        if byte == 0:
            pad += 1
        else:
            break
    return "1" * pad + "".join(_B58[d] for d in reversed(digits))


def derive_did_oracle(public_key_bytes: bytes, method: str = "ebsi") -> str:
    digest = hashlib.sha256(public_key_bytes).digest()
    return f"did:{method}:z{b58encode_longdiv(digest)}"


# ASN.1 DigestInfo prefix for SHA-256 (RFC 8017, PKCS#1 v1.5)
DIGESTINFO_SHA256 = bytes.fromhex("3031300d060960864801650304020105000420")


def rsa_pkcs1v15_sha256_verify(n: int, e: int, message: bytes, signature: bytes) -> bool:
    k = (n.bit_length() + 7) // 8
    if len(signature) != k:
        return False
    em = pow(int.from_bytes(signature, "big"), e, n).to_bytes(k, "big")
    expected = DIGESTINFO_SHA256 + hashlib.sha256(message).digest()
    ps_len = k - len(expected) - 3
    if ps_len < 8:
        return False
    return em == b"\x00\x01" + b"\xff" * ps_len + b"\x00" + expected
