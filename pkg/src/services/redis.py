import hashlib
import logging

import redis
from src.config import get_settings

logger = logging.getLogger(__name__)


# =============================================================================
# Redis Key Constants
# =============================================================================

class RedisKeys:
    """Centralized Redis key definitions."""
    REPORT_PREFIX = "netsec:report:"


class RedisClient:
    """String-valued redis-py connection used for serialized reports."""

    def __init__(self, url: str):
        self.client = redis.Redis.from_url(url, decode_responses=True)

    def set(self, key: str, value: str, expire: int = None) -> bool:
        """Set a key-value pair in Redis."""
        return self.client.setex(key, expire, value) if expire else self.client.set(key, value)

    def get(self, key: str) -> str | None:
        """Get a value by key from Redis."""
        return self.client.get(key)

    def ping(self) -> bool:
        """Test Redis connection."""
        try:
            return self.client.ping()
        except redis.ConnectionError:
            return False


def get_redis_client() -> RedisClient | None:
    """Get a Redis client instance, or None when no cache is configured."""
    url = get_settings().redis_url
    return RedisClient(url) if url else None


# =============================================================================
# Report Cache
# =============================================================================

def config_digest(normalized: str) -> str:
    """SHA-256 of a normalized game configuration."""
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()


def report_key(digest: str, method: str, order: str, start: str, seed: int | None) -> str:
    return f"{RedisKeys.REPORT_PREFIX}{digest}:{method}:{order}:{start}:{seed if seed is not None else '-'}"


def load_cached_report(key: str) -> str | None:
    """Cached report payload, or None on a miss or an unreachable server."""
    client = get_redis_client()
    if client is None:
        return None
    try:
        payload = client.get(key)
    except redis.RedisError as exc:
        logger.warning("report cache unavailable (%s); solving without it", exc)
        return None
    logger.debug("report cache %s for %s", "hit" if payload is not None else "miss", key)
    return payload


def store_cached_report(key: str, payload: str) -> bool:
    client = get_redis_client()
    if client is None:
        return False
    try:
        return bool(client.set(key, payload, expire=get_settings().cache_ttl))
    except redis.RedisError as exc:
        logger.warning("could not store report in cache (%s)", exc)
        return False
