"""Password hashing and bearer tokens.

Passwords: scrypt (n=2^14, r=8, p=1) with a 16-byte random salt, encoded as
scrypt$<n>$<r>$<p>$<salt hex>$<digest hex>. Plaintext never touches disk.
Tokens: 32 random bytes (256 bits), urlsafe-encoded, kept in memory only.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
import time
from dataclasses import dataclass

_SCRYPT_N = 2**14
_SCRYPT_R = 8
_SCRYPT_P = 1


def hash_password(password: str) -> str:
    salt = secrets.token_bytes(16)
    digest = hashlib.scrypt(
        password.encode("utf-8"), salt=salt, n=_SCRYPT_N, r=_SCRYPT_R, p=_SCRYPT_P
    )
    return f"scrypt${_SCRYPT_N}${_SCRYPT_R}${_SCRYPT_P}${salt.hex()}${digest.hex()}"


def verify_password(password: str, encoded: str) -> bool:
    try:
        scheme, n, r, p, salt_hex, digest_hex = encoded.split("$")
        if scheme != "scrypt":
            return False
        digest = hashlib.scrypt(
            password.encode("utf-8"),
            salt=bytes.fromhex(salt_hex),
            n=int(n),
            r=int(r),
            p=int(p),
        )
        return hmac.compare_digest(digest, bytes.fromhex(digest_hex))
    except (ValueError, TypeError):
        return False


@dataclass(frozen=True)
class AuthToken:
    token: str
    teacher: str
    expires_at: int  # UTC milliseconds


class TokenRegistry:
    """In-memory bearer tokens with expiry. Expired tokens are rejected
    everywhere tokens are accepted."""

    def __init__(self, ttl_ms: int = 12 * 3600 * 1000):
        self.ttl_ms = ttl_ms
        self._tokens: dict[str, AuthToken] = {}

    def issue(self, teacher: str, now_ms: int | None = None) -> AuthToken:
        now_ms = int(time.time() * 1000) if now_ms is None else now_ms
        token = AuthToken(
            token=secrets.token_urlsafe(32),
            teacher=teacher,
            expires_at=now_ms + self.ttl_ms,
        )
        self._tokens[token.token] = token
        return token

    def authenticate(self, token: str, now_ms: int | None = None) -> AuthToken | None:
        now_ms = int(time.time() * 1000) if now_ms is None else now_ms
        found = self._tokens.get(token)
        if found is None:
            return None
        if now_ms >= found.expires_at:
            del self._tokens[token]
            return None
        return found
