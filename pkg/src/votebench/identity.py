"""Accounts, email-code verification, sessions, pseudonyms.

The email-to-pseudonym mapping lives only here, in its own access-restricted
table, and nothing in this module ever hands an email to the rest of the
system: the engine and all exports see random pseudonyms. Emails are stored
hashed (salted SHA-256) so the table itself is not a plaintext roster.

Login is code-based: registering or logging in issues a one-time code over
the configured mail transport (a local file sink by default, so desk runs
need no mail server); verifying the code yields a session token.
"""

from __future__ import annotations

import hashlib
import json
import secrets
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .errors import NotAuthorized, SessionExpired, VerificationFailed
from .serialize import dt_str, parse_dt

CODE_TTL = timedelta(minutes=15)
SESSION_TTL = timedelta(hours=24)

ROLES = ("designer", "voter")


class MailTransport:
    def send_code(self, email: str, code: str) -> None:
        raise NotImplementedError


class FileMailSink(MailTransport):
    """Writes outgoing codes to a local file; the offline default."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def send_code(self, email: str, code: str) -> None:
        with open(self.path, "a") as fh:
            fh.write(json.dumps({"to": email, "code": code}) + "\n")


class MemoryMailSink(MailTransport):
    def __init__(self):
        self.outbox: list[tuple[str, str]] = []

    def send_code(self, email: str, code: str) -> None:
        self.outbox.append((email, code))


@dataclass
class IdentityRecord:
    email_hash: str
    role: str
    pseudonym: str
    verified: bool = False
    code_hash: str | None = None
    code_expires_at: datetime | None = None


@dataclass
class SessionToken:
    token: str
    role: str
    principal: str  # pseudonym
    expires_at: datetime


def _hash(value: str, salt: str) -> str:
    return hashlib.sha256(f"{salt}:{value}".encode()).hexdigest()


class IdentityService:
    """Registration, one-time-code verification, and session management."""

    def __init__(
        self,
        mail: MailTransport,
        path: str | Path | None = None,
        session_ttl: timedelta = SESSION_TTL,
        salt: str | None = None,
    ):
        self.mail = mail
        self.path = Path(path) if path else None
        self.session_ttl = session_ttl
        self._lock = threading.Lock()
        self._records: dict[str, IdentityRecord] = {}  # keyed by email hash
        self._sessions: dict[str, SessionToken] = {}
        self._salt = salt or "votebench-identity"
        if self.path and self.path.exists():
            self._load()

    # ------------------------------------------------------------ accounts

    def register(self, email: str, role: str, now: datetime | None = None) -> None:
        """Create (or refresh) an account and send a verification code."""
        if role not in ROLES:
            raise VerificationFailed(f"unknown role {role!r}", field="role")
        now = now or datetime.now(timezone.utc)
        key = _hash(email, self._salt)
        with self._lock:
            rec = self._records.get(key)
            if rec is None:
                rec = IdentityRecord(
                    email_hash=key,
                    role=role,
                    pseudonym=f"{'d' if role == 'designer' else 'v'}-{secrets.token_hex(8)}",
                )
                self._records[key] = rec
            self._issue_code(rec, email, now)
            self._save()

    def request_login_code(self, email: str, now: datetime | None = None) -> None:
        now = now or datetime.now(timezone.utc)
        key = _hash(email, self._salt)
        with self._lock:
            rec = self._records.get(key)
            if rec is None:
                raise VerificationFailed("no account for this email", field="email")
            self._issue_code(rec, email, now)
            self._save()

    def verify(self, email: str, code: str, now: datetime | None = None) -> SessionToken:
        """Exchange a one-time code for a session token. Codes are single-use."""
        now = now or datetime.now(timezone.utc)
        key = _hash(email, self._salt)
        with self._lock:
            rec = self._records.get(key)
            if rec is None or rec.code_hash is None:
                raise VerificationFailed("no pending code for this email")
            if rec.code_expires_at is None or now > rec.code_expires_at:
                raise VerificationFailed("code expired; request a new one")
            if _hash(code, self._salt) != rec.code_hash:
                raise VerificationFailed("wrong code")
            rec.code_hash = None
            rec.code_expires_at = None
            rec.verified = True
            token = SessionToken(
                token=secrets.token_urlsafe(32),  # 256 bits
                role=rec.role,
                principal=rec.pseudonym,
                expires_at=now + self.session_ttl,
            )
            self._sessions[token.token] = token
            self._save()
            return token

    def authenticate(self, token: str, now: datetime | None = None) -> SessionToken:
        now = now or datetime.now(timezone.utc)
        with self._lock:
            session = self._sessions.get(token)
        if session is None:
            raise NotAuthorized("unknown session token")
        if now > session.expires_at:
            raise SessionExpired("session expired; log in again")
        return session

    def delete_identity(self, email: str) -> bool:
        """GDPR-style erasure: drops the email mapping, keeps pseudonymous data."""
        key = _hash(email, self._salt)
        with self._lock:
            removed = self._records.pop(key, None)
            if removed:
                self._sessions = {
                    t: s for t, s in self._sessions.items() if s.principal != removed.pseudonym
                }
                self._save()
            return removed is not None

    # ------------------------------------------------------------ internals

    def _issue_code(self, rec: IdentityRecord, email: str, now: datetime) -> None:
        code = f"{secrets.randbelow(10**6):06d}"
        rec.code_hash = _hash(code, self._salt)
        rec.code_expires_at = now + CODE_TTL
        self.mail.send_code(email, code)

    def _save(self) -> None:
        if not self.path:
            return
        docs = [
            {
                "email_hash": r.email_hash,
                "role": r.role,
                "pseudonym": r.pseudonym,
                "verified": r.verified,
                "code_hash": r.code_hash,
                "code_expires_at": None if r.code_expires_at is None else dt_str(r.code_expires_at),
            }
            for r in self._records.values()
        ]
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_suffix(".tmp")
        tmp.write_text(json.dumps(docs, indent=2))
        tmp.replace(self.path)

    def _load(self) -> None:
        for doc in json.loads(self.path.read_text()):
            rec = IdentityRecord(
                email_hash=doc["email_hash"],
                role=doc["role"],
                pseudonym=doc["pseudonym"],
                verified=doc["verified"],
                code_hash=doc.get("code_hash"),
                code_expires_at=None
                if doc.get("code_expires_at") is None
                else parse_dt(doc["code_expires_at"]),
            )
            self._records[rec.email_hash] = rec
