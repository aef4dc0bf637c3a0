"""Shared JSON-over-HTTP plumbing for the classifier and encoder clients.

Transport-level trouble (unreachable, timeout, 5xx) is retried a fixed number
of times and then surfaces as TransportError; everything else that deviates
from the agreed protocol is a fatal ProtocolError.
"""

from __future__ import annotations

import time

import requests


class VictimError(Exception):
    """Base class for remote-service access failures."""


class TransportError(VictimError):
    """Endpoint unreachable or transiently failing; safe to retry."""


class ProtocolError(VictimError):
    """The endpoint answered, but not in the agreed shape; not retriable."""


RETRIES = 3
BACKOFF_SECONDS = 0.2


def request_json(session, method: str, url: str, payload=None, timeout: float = 30.0):
    """Issue one logical request, retrying transport failures, and parse JSON."""
    last_exc: Exception | None = None
    for attempt in range(RETRIES):
        if attempt:
            time.sleep(BACKOFF_SECONDS * attempt)
        try:
            resp = session.request(method, url, json=payload, timeout=timeout)
        except (requests.ConnectionError, requests.Timeout) as exc:
            last_exc = TransportError(f"{method} {url}: {exc}")
            continue
        except requests.RequestException as exc:
            raise ProtocolError(f"{method} {url}: {exc}") from exc
        if resp.status_code >= 500:
            # Server-side trouble is worth a retry; client errors are not.
            last_exc = TransportError(f"{method} {url}: HTTP {resp.status_code}")
            continue
        if not 200 <= resp.status_code < 300:
            detail = ""
            try:
                detail = resp.json().get("error", "")
            except Exception:
                pass
            raise ProtocolError(f"{method} {url}: HTTP {resp.status_code} {detail}".rstrip())
        try:
            return resp.json()
        except ValueError as exc:
            raise ProtocolError(f"{method} {url}: non-JSON body") from exc
    assert last_exc is not None
    raise last_exc
